fn main() {
    std::process::exit(varietylab::cli::run(std::env::args_os()));
}
