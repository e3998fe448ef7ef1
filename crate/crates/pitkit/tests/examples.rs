mod waring {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/waring.rs"));
}

#[test]
fn waring_example_runs() {
    waring::run_example().expect("waring example should run");
}

mod didi {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/didi.rs"));
}

#[test]
fn didi_example_runs() {
    didi::run_example().expect("didi example should run");
}

mod duality_roabp {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/duality_roabp.rs"));
}

#[test]
fn duality_roabp_example_runs() {
    duality_roabp::run_example().expect("duality_roabp example should run");
}

mod sparse_ks {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/sparse_ks.rs"));
}

#[test]
fn sparse_ks_example_runs() {
    sparse_ks::run_example().expect("sparse_ks example should run");
}

mod product_hitting_set {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/product_hitting_set.rs"));
}

#[test]
fn product_hitting_set_example_runs() {
    product_hitting_set::run_example().expect("product_hitting_set example should run");
}

mod jacobian_hitting_set {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/jacobian_hitting_set.rs"));
}

#[test]
fn jacobian_hitting_set_example_runs() {
    jacobian_hitting_set::run_example().expect("jacobian_hitting_set example should run");
}

mod faithful_composed {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/faithful_composed.rs"));
}

#[test]
fn faithful_composed_example_runs() {
    faithful_composed::run_example().expect("faithful_composed example should run");
}

mod parse_expand {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/parse_expand.rs"));
}

#[test]
fn parse_expand_example_runs() {
    parse_expand::run_example().expect("parse_expand example should run");
}

mod series_kernels {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/series_kernels.rs"));
}

#[test]
fn series_kernels_example_runs() {
    series_kernels::run_example().expect("series_kernels example should run");
}

mod oracle_gen {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/oracle_gen.rs"));
}

#[test]
fn oracle_gen_example_runs() {
    oracle_gen::run_example().expect("oracle_gen example should run");
}

mod cli_run {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/cli_run.rs"));
}

#[test]
fn cli_run_example_runs() {
    cli_run::run_example().expect("cli_run example should run");
}
