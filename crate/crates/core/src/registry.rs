//! Name-keyed registries for interchangeable strategies (norms, pressure
//! methods, eigen-residual engines). Each family registers its built-in
//! variants; callers may add their own before lookup.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Builds a strategy instance from an optional numeric parameter
/// (`"besov:0.5"` passes `Some(0.5)`).
pub type Factory<T> = Arc<dyn Fn(Option<f64>) -> Result<Arc<T>> + Send + Sync>;

pub struct Registry<T: ?Sized> {
    family: &'static str,
    factories: BTreeMap<String, Factory<T>>,
}

impl<T: ?Sized> Clone for Registry<T> {
    fn clone(&self) -> Self {
        Registry {
            family: self.family,
            factories: self.factories.clone(),
        }
    }
}

impl<T: ?Sized> Registry<T> {
    pub fn new(family: &'static str) -> Self {
        Registry {
            family,
            factories: BTreeMap::new(),
        }
    }

    /// Set or replace the factory for `name`.
    pub fn register<F>(&mut self, name: &str, factory: F)
    where
        F: Fn(Option<f64>) -> Result<Arc<T>> + Send + Sync + 'static,
    {
        self.factories.insert(name.to_string(), Arc::new(factory));
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.factories.keys().map(String::as_str)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.factories.contains_key(name)
    }

    /// Resolve `"name"` or `"name:param"`.
    pub fn resolve(&self, spec: &str) -> Result<Arc<T>> {
        let (name, param) = match spec.split_once(':') {
            Some((n, p)) => {
                let v: f64 = p.trim().parse().map_err(|_| {
                    Error::Validation(format!("{} {spec:?}: parameter {p:?} is not a number", self.family))
                })?;
                (n.trim(), Some(v))
            }
            None => (spec.trim(), None),
        };
        let factory = self.factories.get(name).ok_or_else(|| {
            let known: Vec<_> = self.names().collect();
            Error::Validation(format!(
                "unknown {} {name:?}; registered: {}",
                self.family,
                known.join(", ")
            ))
        })?;
        factory(param)
    }
}
