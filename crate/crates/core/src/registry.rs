//! Name-keyed registries for interchangeable strategies.

use std::fmt;

use crate::error::{invalid, Result};

type Factory<T> = fn() -> Box<T>;

struct Entry<T: ?Sized> {
    name: &'static str,
    summary: &'static str,
    make: Factory<T>,
}

/// A small ordered registry mapping names to constructors of boxed trait objects.
pub struct Registry<T: ?Sized> {
    kind: &'static str,
    entries: Vec<Entry<T>>,
}

impl<T: ?Sized> Registry<T> {
    pub fn new(kind: &'static str) -> Self {
        Registry { kind, entries: Vec::new() }
    }

    /// Adds a strategy. Panics on a duplicate name, which is a programming error.
    pub fn register(&mut self, name: &'static str, summary: &'static str, make: Factory<T>) {
        assert!(
            self.entries.iter().all(|e| e.name != name),
            "duplicate {} `{name}`",
            self.kind
        );
        self.entries.push(Entry { name, summary, make });
    }

    pub fn with(mut self, name: &'static str, summary: &'static str, make: Factory<T>) -> Self {
        self.register(name, summary, make);
        self
    }

    pub fn create(&self, name: &str) -> Result<Box<T>> {
        self.entries
            .iter()
            .find(|e| e.name == name)
            .map(|e| (e.make)())
            .ok_or_else(|| {
                invalid(format!(
                    "unknown {} `{name}` (known: {})",
                    self.kind,
                    self.names().join(", ")
                ))
            })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|e| e.name).collect()
    }

    pub fn describe(&self) -> Vec<(&'static str, &'static str)> {
        self.entries.iter().map(|e| (e.name, e.summary)).collect()
    }
}

impl<T: ?Sized> fmt::Debug for Registry<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Registry").field("kind", &self.kind).field("names", &self.names()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    trait Greeter {
        fn hi(&self) -> &'static str;
    }
    struct A;
    impl Greeter for A {
        fn hi(&self) -> &'static str {
            "a"
        }
    }

    #[test]
    fn lookup_and_unknown() {
        let r: Registry<dyn Greeter> = Registry::new("greeter").with("a", "says a", || Box::new(A));
        assert_eq!(r.create("a").unwrap().hi(), "a");
        let err = r.create("b").err().unwrap().to_string();
        assert!(err.contains("known: a"), "{err}");
    }
}
