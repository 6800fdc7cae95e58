pub mod jet;
pub mod specfun;
pub mod reduction;
pub mod families;
pub mod verify;
