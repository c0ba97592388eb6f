use std::fmt;
use std::sync::Arc;

/// Side condition attached to a symbol and applied as a rewrite rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Flag {
    None,
    /// s^2 = 1
    Sign,
    /// s^2 = s
    Idempotent,
    /// s > 0, so |s| = s
    Positive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymKind {
    /// t or x
    Independent,
    /// u differentiated nt times in t and nx times in x
    Jet(u8, u8),
    /// any other coordinate (f, g on the augmented chart, formal arguments)
    Coordinate,
    Parameter,
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol {
    kind: SymKind,
    name: Arc<str>,
    flag: Flag,
}

impl Symbol {
    pub fn new(name: &str, kind: SymKind, flag: Flag) -> Symbol {
        Symbol { kind, name: Arc::from(name), flag }
    }

    pub fn t() -> Symbol {
        Symbol::new("t", SymKind::Independent, Flag::None)
    }

    pub fn x() -> Symbol {
        Symbol::new("x", SymKind::Independent, Flag::None)
    }

    pub fn u() -> Symbol {
        Symbol::jet(0, 0)
    }

    /// Jet coordinate with canonical name: `u`, `u_t`, `u_tx`, `u_txx`, ...
    pub fn jet(nt: u8, nx: u8) -> Symbol {
        Symbol::new(&jet_name(nt, nx), SymKind::Jet(nt, nx), Flag::None)
    }

    pub fn coord(name: &str) -> Symbol {
        Symbol::new(name, SymKind::Coordinate, Flag::None)
    }

    pub fn param(name: &str) -> Symbol {
        Symbol::new(name, SymKind::Parameter, Flag::None)
    }

    pub fn sign_param(name: &str) -> Symbol {
        Symbol::new(name, SymKind::Parameter, Flag::Sign)
    }

    pub fn idempotent_param(name: &str) -> Symbol {
        Symbol::new(name, SymKind::Parameter, Flag::Idempotent)
    }

    pub fn with_flag(&self, flag: Flag) -> Symbol {
        Symbol { kind: self.kind, name: self.name.clone(), flag }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> SymKind {
        self.kind
    }

    pub fn flag(&self) -> Flag {
        self.flag
    }

    pub fn is_param(&self) -> bool {
        self.kind == SymKind::Parameter
    }

    pub fn jet_index(&self) -> Option<(u8, u8)> {
        match self.kind {
            SymKind::Jet(a, b) => Some((a, b)),
            _ => None,
        }
    }

    pub fn jet_order(&self) -> Option<u8> {
        self.jet_index().map(|(a, b)| a + b)
    }

    pub(crate) fn mask_bit(&self) -> u64 {
        name_bit(&self.name)
    }
}

pub fn jet_name(nt: u8, nx: u8) -> String {
    if nt + nx == 0 {
        return "u".to_string();
    }
    let mut s = String::from("u_");
    for _ in 0..nt {
        s.push('t');
    }
    for _ in 0..nx {
        s.push('x');
    }
    s
}

/// One bit of a 64-bit presence mask, chosen by an FNV hash of the name.
pub(crate) fn name_bit(name: &str) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in name.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    1u64 << (h % 64)
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}
