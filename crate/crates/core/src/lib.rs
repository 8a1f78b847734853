pub mod automaton;
pub mod cegis;
pub mod encoder;
pub mod eval;
pub mod io;
pub mod ltl;
pub mod sat;
pub mod scenario;
pub mod synthesis;
