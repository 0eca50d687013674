use std::sync::OnceLock;

use super::regimes::{
    IrrationalIrrational, IrrationalLine, IrrationalRational, RationalIrrational, RationalLine,
    RationalRational, TauPositive,
};
use super::Regime;
use crate::error::{Error, Result};

/// Regimes keyed by number and by name.
#[derive(Default)]
pub struct RegimeRegistry {
    regimes: Vec<Box<dyn Regime>>,
}

impl RegimeRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, regime: Box<dyn Regime>) -> Result<()> {
        if self
            .regimes
            .iter()
            .any(|r| r.id() == regime.id() || r.name() == regime.name())
        {
            return Err(Error::InvalidArgument(format!(
                "regime {} ({}) already registered",
                regime.id(),
                regime.name()
            )));
        }
        self.regimes.push(regime);
        Ok(())
    }

    /// The seven regimes of the classification.
    pub fn standard() -> &'static RegimeRegistry {
        static STANDARD: OnceLock<RegimeRegistry> = OnceLock::new();
        STANDARD.get_or_init(|| {
            let mut reg = RegimeRegistry::new();
            let all: [Box<dyn Regime>; 7] = [
                Box::new(TauPositive),
                Box::new(RationalLine),
                Box::new(IrrationalLine),
                Box::new(RationalRational),
                Box::new(RationalIrrational),
                Box::new(IrrationalRational),
                Box::new(IrrationalIrrational),
            ];
            for r in all {
                reg.register(r).expect("standard regimes are distinct");
            }
            reg
        })
    }

    pub fn get(&self, id: u8) -> Result<&dyn Regime> {
        self.regimes
            .iter()
            .find(|r| r.id() == id)
            .map(|r| r.as_ref())
            .ok_or_else(|| Error::InvalidArgument(format!("no regime numbered {id}")))
    }

    pub fn by_name(&self, name: &str) -> Option<&dyn Regime> {
        self.regimes
            .iter()
            .find(|r| r.name() == name)
            .map(|r| r.as_ref())
    }

    /// Accepts either the number or the name.
    pub fn lookup(&self, key: &str) -> Result<&dyn Regime> {
        match key.parse::<u8>() {
            Ok(id) => self.get(id),
            Err(_) => self
                .by_name(key)
                .ok_or_else(|| Error::InvalidArgument(format!("unknown regime `{key}`"))),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn Regime> {
        self.regimes.iter().map(|r| r.as_ref())
    }

    pub fn len(&self) -> usize {
        self.regimes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regimes.is_empty()
    }
}
