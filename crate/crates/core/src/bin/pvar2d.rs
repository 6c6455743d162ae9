fn main() {
    std::process::exit(pvar2d::cli::main_with_args(std::env::args_os()));
}
