fn main() {
    let env_seed = std::env::var(cluster_sim_cli::config::SEED_ENV).ok();
    std::process::exit(cluster_sim_cli::run(std::env::args_os(), env_seed.as_deref()));
}
