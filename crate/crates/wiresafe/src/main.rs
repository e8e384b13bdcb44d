fn main() {
    std::process::exit(wiresafe::cli::run());
}
