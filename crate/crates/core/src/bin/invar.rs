fn main() {
    std::process::exit(invar::cli::main_from_env());
}
