use serde::{Deserialize, Serialize};

use super::entwine::SubPresentation;
use super::presentation::TreePresentation;
use super::CantorError;

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ChainFile {
    links: Vec<TreePresentation>,
}

/// A finite chain `X_0 ⊆ X_1 ⊆ ... ⊆ X_n` of presented Cantor spaces, each
/// entwined in the next.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "ChainFile", into = "ChainFile")]
pub struct EntwinedChain {
    links: Vec<TreePresentation>,
    #[serde(skip)]
    subs: Vec<SubPresentation>,
}

impl TryFrom<ChainFile> for EntwinedChain {
    type Error = CantorError;

    fn try_from(f: ChainFile) -> Result<Self, Self::Error> {
        EntwinedChain::new(f.links)
    }
}

impl From<EntwinedChain> for ChainFile {
    fn from(c: EntwinedChain) -> Self {
        ChainFile { links: c.links }
    }
}

impl EntwinedChain {
    /// Validates every link and checks that each space is entwined in the
    /// next, reporting the first interior cylinder found otherwise.
    pub fn new(links: Vec<TreePresentation>) -> Result<Self, CantorError> {
        if links.is_empty() {
            return Err(CantorError::Precondition("a chain needs at least one space".into()));
        }
        for l in &links {
            l.ensure_cantor()?;
        }
        let mut subs = Vec::with_capacity(links.len().saturating_sub(1));
        for pair in links.windows(2) {
            let s = SubPresentation::new(pair[1].clone(), pair[0].clone())?;
            let e = s.is_entwined()?;
            if let Some(witness) = e.witness {
                return Err(CantorError::NotEntwined { witness });
            }
            subs.push(s);
        }
        Ok(Self { links, subs })
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    pub fn space(&self, n: usize) -> &TreePresentation {
        &self.links[n]
    }

    /// The inclusion `X_n ⊆ X_{n+1}`.
    pub fn link(&self, n: usize) -> &SubPresentation {
        &self.subs[n]
    }
}
