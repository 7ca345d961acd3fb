fn main() {
    std::process::exit(l1pca::cli::main_from_env());
}
