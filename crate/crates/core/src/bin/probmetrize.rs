fn main() {
    std::process::exit(probmetrize::cli::run());
}
