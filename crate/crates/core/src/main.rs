fn main() {
    std::process::exit(symmspec::cli::run());
}
