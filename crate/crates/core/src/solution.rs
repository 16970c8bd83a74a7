use serde::Serialize;

use crate::instance::{Instance, LinkId};

/// A set of original links and its total weight.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Solution {
    pub links: Vec<LinkId>,
    pub weight: u64,
}

impl Solution {
    pub fn from_links(instance: &Instance, mut links: Vec<LinkId>) -> Self {
        links.sort_unstable();
        links.dedup();
        let weight = instance.weight_of(&links);
        Solution { links, weight }
    }

    pub fn covers(&self, instance: &Instance) -> bool {
        instance.covers_all(&self.links)
    }
}
