fn main() {
    std::process::exit(nonlocal_euler::cli::main_with_args(std::env::args_os()));
}
