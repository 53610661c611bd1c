//! Network tomography with expander-based identifiability certificates.
//!
//! The crate models networks and their probe routing matrices
//! ([`netgraph`]), certifies when a routing matrix allows recovering a
//! single congested link from end-to-end delays ([`expander`]), recovers
//! link delays by l1-minimization ([`tomo`]) on a self-contained LP/ILP
//! engine ([`lp`]), selects minimum probe-path sets ([`pathsel`]),
//! generates Internet-like test topologies ([`topogen`]) and runs seeded
//! experiments over them ([`sim`]).

pub mod expander;
pub mod fixtures;
pub mod lp;
pub mod netgraph;
pub mod pathsel;
pub mod sim;
pub mod tomo;
pub mod topogen;
