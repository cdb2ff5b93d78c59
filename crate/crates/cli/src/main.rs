fn main() {
    std::process::exit(consisteval::run(std::env::args_os()));
}
