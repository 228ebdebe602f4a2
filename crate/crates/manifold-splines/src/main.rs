fn main() {
    std::process::exit(manifold_splines::cli::run(std::env::args_os()));
}
