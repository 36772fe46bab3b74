fn main() {
    std::process::exit(mildcurve::cli::run());
}
