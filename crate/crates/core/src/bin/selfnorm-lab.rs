fn main() { std::process::exit(selfnorm_lab::cli::main()) }
