fn main() {
    std::process::exit(thetaconst::cli::run(std::env::args_os()));
}
