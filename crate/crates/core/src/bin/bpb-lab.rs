fn main() {
    std::process::exit(bpb_lab::batch::cli_main());
}
