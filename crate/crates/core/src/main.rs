fn main() {
    std::process::exit(heis_overdet::cli::run(std::env::args_os()));
}
