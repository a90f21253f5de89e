fn main() {
    std::process::exit(jcdc::cli::run(std::env::args_os()));
}
