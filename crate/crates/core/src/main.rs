fn main() {
    std::process::exit(ptqh::cli::run());
}
