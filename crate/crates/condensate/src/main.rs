fn main() {
    std::process::exit(condensate::cli::run());
}
