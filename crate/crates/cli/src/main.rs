fn main() {
    std::process::exit(clusterlab_cli::run(std::env::args()));
}
