fn main() {
    std::process::exit(od_core::cli::main_from_env());
}
