pub mod bass_serre;
pub mod cantor;
pub mod cli;
pub mod kleinian;
pub mod raag;
pub mod sierpinski;
pub mod sphere;
