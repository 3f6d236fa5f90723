//! The bundled example suites, compiled into the binary.

pub struct Suite {
    pub name: &'static str,
    pub source: &'static str,
}

macro_rules! suite {
    ($name:literal) => {
        Suite { name: $name, source: include_str!(concat!("../scenarios/", $name, ".json")) }
    };
}

pub const SUITES: &[Suite] = &[
    suite!("identities"),
    suite!("morita"),
    suite!("witness"),
    suite!("trivialization"),
    suite!("dlog"),
    suite!("descent"),
    suite!("boundary"),
];

pub fn names() -> Vec<&'static str> {
    SUITES.iter().map(|s| s.name).collect()
}
