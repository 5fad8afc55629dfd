fn main() {
    std::process::exit(zeck_ew::cli::run(std::env::args_os()));
}
