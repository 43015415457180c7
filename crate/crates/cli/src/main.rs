fn main() {
    std::process::exit(colnet_cli::run(std::env::args_os()));
}
