//! Interned constructor symbols.
//!
//! Symbols are interned process-wide so that name equality coincides with id
//! equality everywhere, regardless of which arena an expression lives in.

use std::collections::HashMap;
use std::fmt;
use std::sync::{LazyLock, RwLock};

/// An interned non-variable symbol.
///
/// Equality and hashing are O(1) on the interned id; ordering goes through
/// the symbol table and compares names byte-lexicographically.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Symbol(u32);

struct Interner {
    names: Vec<&'static str>,
    ids: HashMap<&'static str, u32>,
}

static INTERNER: LazyLock<RwLock<Interner>> = LazyLock::new(|| {
    RwLock::new(Interner {
        names: Vec::new(),
        ids: HashMap::new(),
    })
});

/// A symbol name starts with a lowercase ASCII letter or digit and continues
/// with ASCII alphanumerics or underscores.
pub fn is_valid_symbol_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() || c.is_ascii_digit() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Symbol {
    /// Interns `name`, returning the same id for equal names.
    ///
    /// Panics if `name` is not a valid symbol name.
    pub fn intern(name: &str) -> Symbol {
        assert!(
            is_valid_symbol_name(name),
            "invalid symbol name: {name:?}"
        );
        {
            let table = INTERNER.read().unwrap();
            if let Some(&id) = table.ids.get(name) {
                return Symbol(id);
            }
        }
        let mut table = INTERNER.write().unwrap();
        // Re-check: another thread may have interned it between the locks.
        if let Some(&id) = table.ids.get(name) {
            return Symbol(id);
        }
        let leaked: &'static str = Box::leak(name.to_owned().into_boxed_str());
        let id = table.names.len() as u32;
        table.names.push(leaked);
        table.ids.insert(leaked, id);
        Symbol(id)
    }

    /// The interned name.
    pub fn name(self) -> &'static str {
        INTERNER.read().unwrap().names[self.0 as usize]
    }

    /// The interned id. Bijective with names.
    pub fn id(self) -> u32 {
        self.0
    }

    /// Byte-lexicographic order on names; ids are compared only as an
    /// equality fast path.
    pub fn cmp_by_name(a: Symbol, b: Symbol) -> std::cmp::Ordering {
        if a == b {
            std::cmp::Ordering::Equal
        } else {
            a.name().cmp(b.name())
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Symbol({})", self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interning_is_bijective() {
        let a1 = Symbol::intern("some_symbol");
        let a2 = Symbol::intern("some_symbol");
        let b = Symbol::intern("other_symbol");
        assert_eq!(a1, a2);
        assert_ne!(a1, b);
        assert_eq!(a1.name(), "some_symbol");
    }

    #[test]
    fn name_validation() {
        assert!(is_valid_symbol_name("f"));
        assert!(is_valid_symbol_name("0arity"));
        assert!(is_valid_symbol_name("snake_case1"));
        assert!(!is_valid_symbol_name(""));
        assert!(!is_valid_symbol_name("Upper"));
        assert!(!is_valid_symbol_name("_underscore"));
        assert!(!is_valid_symbol_name("sp ace"));
    }

    #[test]
    #[should_panic(expected = "invalid symbol name")]
    fn intern_rejects_variables() {
        Symbol::intern("X1");
    }
}
