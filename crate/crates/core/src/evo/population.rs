use alloc::vec::Vec;

/// A decision vector together with its cached objective vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub decision: Vec<f64>,
    pub objectives: Vec<f64>,
}

impl Individual {
    pub fn new(decision: Vec<f64>, objectives: Vec<f64>) -> Self {
        Self {
            decision,
            objectives,
        }
    }
}

/// Ordered members with a capacity that environmental selection truncates to.
#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub members: Vec<Individual>,
    pub capacity: usize,
}

impl Population {
    pub fn new(members: Vec<Individual>, capacity: usize) -> Self {
        Self { members, capacity }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn objectives(&self) -> Vec<&[f64]> {
        self.members.iter().map(|m| m.objectives.as_slice()).collect()
    }
}
