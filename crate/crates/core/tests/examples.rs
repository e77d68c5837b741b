mod quickstart {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/quickstart.rs"));
}
mod memory_hierarchy {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/memory_hierarchy.rs"));
}
mod imperfect_information {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/imperfect_information.rs"));
}
mod strategy_enumeration {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/strategy_enumeration.rs"));
}
mod product_and_ltl {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/product_and_ltl.rs"));
}
mod nested_formulas {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/nested_formulas.rs"));
}
mod turing_gadget {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/turing_gadget.rs"));
}

#[test]
fn quickstart_runs() {
    quickstart::run_example().expect("quickstart example failed");
}

#[test]
fn memory_hierarchy_runs() {
    memory_hierarchy::run_example().expect("memory_hierarchy example failed");
}

#[test]
fn imperfect_information_runs() {
    imperfect_information::run_example().expect("imperfect_information example failed");
}

#[test]
fn strategy_enumeration_runs() {
    strategy_enumeration::run_example().expect("strategy_enumeration example failed");
}

#[test]
fn product_and_ltl_runs() {
    product_and_ltl::run_example().expect("product_and_ltl example failed");
}

#[test]
fn nested_formulas_runs() {
    nested_formulas::run_example().expect("nested_formulas example failed");
}

#[test]
fn turing_gadget_runs() {
    turing_gadget::run_example().expect("turing_gadget example failed");
}
