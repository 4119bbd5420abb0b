pub mod frames;
pub mod potential;
pub mod verify;
pub mod wigner;
