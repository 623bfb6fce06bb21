//! Interned node labels.

use std::collections::HashMap;
use std::fmt;
use std::sync::RwLock;

use once_cell::sync::Lazy;

use crate::error::{Error, Result};

/// The reserved placeholder symbol for an absent binary child.
pub const BOX: &str = "□";

struct Interner {
    ids: HashMap<&'static str, u32>,
    names: Vec<&'static str>,
}

static INTERNER: Lazy<RwLock<Interner>> = Lazy::new(|| {
    RwLock::new(Interner {
        ids: HashMap::new(),
        names: Vec::new(),
    })
});

/// A node label. Two labels are equal iff their strings are equal.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label(u32);

impl Label {
    pub fn new(name: &str) -> Result<Label> {
        if name.is_empty() || name == BOX {
            return Err(Error::InvalidLabel(name.to_string()));
        }
        if let Some(&id) = INTERNER.read().unwrap().ids.get(name) {
            return Ok(Label(id));
        }
        let mut guard = INTERNER.write().unwrap();
        if let Some(&id) = guard.ids.get(name) {
            return Ok(Label(id));
        }
        let leaked: &'static str = Box::leak(name.to_string().into_boxed_str());
        let id = guard.names.len() as u32;
        guard.names.push(leaked);
        guard.ids.insert(leaked, id);
        Ok(Label(id))
    }

    /// Interns a label known to be valid. Panics otherwise.
    pub fn of(name: &str) -> Label {
        Label::new(name).expect("invalid label")
    }

    pub fn as_str(self) -> &'static str {
        INTERNER.read().unwrap().names[self.0 as usize]
    }

    pub fn id(self) -> u32 {
        self.0
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_str())
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interning_is_by_string() {
        assert_eq!(Label::of("f"), Label::of("f"));
        assert_ne!(Label::of("f"), Label::of("g"));
        assert_eq!(Label::of("xs:el").as_str(), "xs:el");
    }

    #[test]
    fn rejects_reserved() {
        assert!(Label::new("").is_err());
        assert!(Label::new(BOX).is_err());
    }
}
