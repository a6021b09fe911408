fn main() {
    std::process::exit(bgls::cli::main_with(std::env::args_os()));
}
