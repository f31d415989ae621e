//! Rasters, disparity maps, masks, observations and image I/O.

mod grid;
mod io;
mod map;
mod noise;
mod scene;

pub use grid::{Grid, Mask};
pub use io::{load_image, read_image, save_image, save_mask, write_image, ImageFormat};
pub use map::{DisparityMap, Observation};
pub use noise::{add_gaussian_noise, gaussian_field};
pub use scene::{synth_scene, SceneKind};
