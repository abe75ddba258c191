fn main() {
    std::process::exit(ball_asymptotics::cli::run(std::env::args_os()));
}
