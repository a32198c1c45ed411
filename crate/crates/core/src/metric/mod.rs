pub mod paths;
pub mod space;
pub mod verify;
