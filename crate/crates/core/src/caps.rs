//! Enumeration caps. Defaults keep every exhaustive routine at desk scale;
//! `TEMPO_PCSP_CAPS="indicator=5000000,kvars=80"` raises them.

use std::sync::OnceLock;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Caps {
    /// Maximal arity of compiled temporal relations.
    pub arity: usize,
    /// Maximal domain size for `isomorphic`.
    pub iso: usize,
    /// Constraint enumerations per relation when building indicator instances.
    pub indicator: u64,
    /// Maximal number of variables for k-strategies.
    pub kvars: usize,
    /// Maximal k for k-strategies.
    pub k: usize,
    /// Maximal number of candidate tuples generated by a k-strategy run.
    pub kcells: u64,
    /// Maximal column count of a fully materialized relaxation.
    pub relax: usize,
    /// Maximal m for power constructions over temporal structures.
    pub power: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            arity: 4,
            iso: 10,
            indicator: 1_000_000,
            kvars: 64,
            k: 4,
            kcells: 50_000_000,
            relax: 60_000,
            power: 3,
        }
    }
}

impl Caps {
    pub fn parse(spec: &str) -> Result<Caps, String> {
        let mut caps = Caps::default();
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| format!("expected key=value, got `{item}`"))?;
            let n: u64 = value
                .trim()
                .parse()
                .map_err(|_| format!("bad number in `{item}`"))?;
            match key.trim() {
                "arity" => caps.arity = n as usize,
                "iso" => caps.iso = n as usize,
                "indicator" => caps.indicator = n,
                "kvars" => caps.kvars = n as usize,
                "k" => caps.k = n as usize,
                "kcells" => caps.kcells = n,
                "relax" => caps.relax = n as usize,
                "power" => caps.power = n as usize,
                other => return Err(format!("unknown cap `{other}`")),
            }
        }
        Ok(caps)
    }

    pub fn from_env() -> Caps {
        match std::env::var("TEMPO_PCSP_CAPS") {
            Ok(s) => Caps::parse(&s).unwrap_or_else(|e| panic!("TEMPO_PCSP_CAPS: {e}")),
            Err(_) => Caps::default(),
        }
    }
}

/// Process-wide caps, read once from the environment.
pub fn caps() -> &'static Caps {
    static CAPS: OnceLock<Caps> = OnceLock::new();
    CAPS.get_or_init(Caps::from_env)
}
