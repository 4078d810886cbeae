fn main() {
    std::process::exit(pt_stokes::cli::run(std::env::args_os()));
}
