pub mod bump;
pub mod exercise;
pub mod transport;
pub mod wave;
