fn main() {
    std::process::exit(pbasis::cli::run());
}
