//! Simulated tapping environment: a rectangular-footprint object resting on a
//! flat desk inside a square search area.
//!
//! Object-local coordinates `(u, v)` run along the object's length and width
//! from its placement corner; the search area uses centimetres with the origin
//! at one corner. Taps arrive in normalized `[0, 1]²` coordinates.

use alloc::format;
use alloc::string::String;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::{Error, Point2};

/// Classification tolerance (cm) for footprint edges, absorbing the rounding
/// of normalized grid coordinates back to centimetres.
const EDGE_TOLERANCE_CM: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Profile {
    /// `mean + amplitude · sin(2π u / period)`, constant across the width.
    Wave {
        mean_cm: f64,
        amplitude_cm: f64,
        period_cm: f64,
    },
    /// Linear ramp from 0 at `u = 0` to the bounding height at `u = length`.
    Ramp,
    /// Constant height.
    Flat,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeightField {
    length_cm: f64,
    width_cm: f64,
    height_cm: f64,
    profile: Profile,
}

/// 16 × 6 × 11 cm block whose top follows two full sine periods between 3 and
/// 11 cm.
pub fn wave_block() -> HeightField {
    HeightField {
        length_cm: 16.0,
        width_cm: 6.0,
        height_cm: 11.0,
        profile: Profile::Wave {
            mean_cm: 7.0,
            amplitude_cm: 4.0,
            period_cm: 8.0,
        },
    }
}

/// 17 × 6 × 8 cm block rising linearly along its length.
pub fn slope_block() -> HeightField {
    HeightField {
        length_cm: 17.0,
        width_cm: 6.0,
        height_cm: 8.0,
        profile: Profile::Ramp,
    }
}

/// Flat-topped box.
pub fn flat_box(length_cm: f64, width_cm: f64, height_cm: f64) -> Result<HeightField, Error> {
    if !(length_cm > 0.0 && width_cm > 0.0 && height_cm >= 0.0) {
        return Err(Error::InvalidParameter("box dimensions must be positive"));
    }
    Ok(HeightField {
        length_cm,
        width_cm,
        height_cm,
        profile: Profile::Flat,
    })
}

impl HeightField {
    pub fn length_cm(&self) -> f64 {
        self.length_cm
    }

    pub fn width_cm(&self) -> f64 {
        self.width_cm
    }

    /// Declared bounding height.
    pub fn height_cm(&self) -> f64 {
        self.height_cm
    }

    pub fn profile(&self) -> Profile {
        self.profile
    }

    /// Surface height at local `(u, v)`; callers keep `(u, v)` on the footprint.
    pub fn height_at(&self, u: f64, _v: f64) -> f64 {
        let u = u.clamp(0.0, self.length_cm);
        match self.profile {
            Profile::Wave {
                mean_cm,
                amplitude_cm,
                period_cm,
            } => mean_cm + amplitude_cm * libm::sin(2.0 * core::f64::consts::PI * u / period_cm),
            Profile::Ramp => self.height_cm * u / self.length_cm,
            Profile::Flat => self.height_cm,
        }
    }

    /// Human-readable geometry tag, reported alongside results.
    pub fn describe(&self) -> String {
        match self.profile {
            Profile::Wave {
                mean_cm,
                amplitude_cm,
                period_cm,
            } => format!(
                "wave {}x{}x{} cm: h(u) = {} + {}*sin(2*pi*u/{})",
                self.length_cm, self.width_cm, self.height_cm, mean_cm, amplitude_cm, period_cm
            ),
            Profile::Ramp => format!(
                "slope {}x{}x{} cm: h(u) = {}*u/{}",
                self.length_cm, self.width_cm, self.height_cm, self.height_cm, self.length_cm
            ),
            Profile::Flat => format!(
                "box {}x{}x{} cm: h = {}",
                self.length_cm, self.width_cm, self.height_cm, self.height_cm
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TapResult {
    /// Height divided by the scene height scale.
    pub height: f64,
    pub on_surface: bool,
    pub raw_height_cm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    area_cm: (f64, f64),
    object: HeightField,
    placement_cm: (f64, f64),
    desk_height_cm: f64,
    height_scale_cm: f64,
    noise_sd_cm: f64,
}

impl Scene {
    pub const DEFAULT_AREA_CM: f64 = 23.0;
    pub const DEFAULT_PLACEMENT_CM: (f64, f64) = (5.0, 8.5);
    pub const DEFAULT_HEIGHT_SCALE_CM: f64 = 15.0;

    pub fn new(
        area_cm: (f64, f64),
        object: HeightField,
        placement_cm: (f64, f64),
        height_scale_cm: f64,
    ) -> Result<Self, Error> {
        if !(area_cm.0 > 0.0 && area_cm.1 > 0.0) {
            return Err(Error::InvalidParameter(
                "search area must have positive sides",
            ));
        }
        if !(height_scale_cm.is_finite() && height_scale_cm > 0.0) {
            return Err(Error::InvalidParameter("height scale must be positive"));
        }
        let (px, py) = placement_cm;
        if px < 0.0
            || py < 0.0
            || px + object.length_cm > area_cm.0 + EDGE_TOLERANCE_CM
            || py + object.width_cm > area_cm.1 + EDGE_TOLERANCE_CM
        {
            return Err(Error::InvalidParameter(
                "object footprint does not fit inside the search area",
            ));
        }
        Ok(Scene {
            area_cm,
            object,
            placement_cm,
            desk_height_cm: 0.0,
            height_scale_cm,
            noise_sd_cm: 0.0,
        })
    }

    /// Standard deviation of Gaussian noise added to on-surface heights.
    pub fn with_noise_sd(mut self, noise_sd_cm: f64) -> Result<Self, Error> {
        if !(noise_sd_cm.is_finite() && noise_sd_cm >= 0.0) {
            return Err(Error::InvalidParameter("noise_sd_cm must be non-negative"));
        }
        self.noise_sd_cm = noise_sd_cm;
        Ok(self)
    }

    pub fn area_cm(&self) -> (f64, f64) {
        self.area_cm
    }

    pub fn object(&self) -> &HeightField {
        &self.object
    }

    pub fn placement_cm(&self) -> (f64, f64) {
        self.placement_cm
    }

    pub fn desk_height_cm(&self) -> f64 {
        self.desk_height_cm
    }

    pub fn height_scale_cm(&self) -> f64 {
        self.height_scale_cm
    }

    pub fn noise_sd_cm(&self) -> f64 {
        self.noise_sd_cm
    }

    pub fn to_cm(&self, p: Point2) -> (f64, f64) {
        (p.x * self.area_cm.0, p.y * self.area_cm.1)
    }

    /// Closed footprint test in area centimetres.
    pub fn on_footprint_cm(&self, x_cm: f64, y_cm: f64) -> bool {
        let (px, py) = self.placement_cm;
        x_cm >= px - EDGE_TOLERANCE_CM
            && x_cm <= px + self.object.length_cm + EDGE_TOLERANCE_CM
            && y_cm >= py - EDGE_TOLERANCE_CM
            && y_cm <= py + self.object.width_cm + EDGE_TOLERANCE_CM
    }

    pub fn on_footprint(&self, p: Point2) -> bool {
        let (x, y) = self.to_cm(p);
        self.on_footprint_cm(x, y)
    }

    /// Ground-truth height in cm (object top or desk).
    pub fn true_height_cm(&self, p: Point2) -> f64 {
        let (x, y) = self.to_cm(p);
        if self.on_footprint_cm(x, y) {
            let (px, py) = self.placement_cm;
            self.object.height_at(x - px, y - py)
        } else {
            self.desk_height_cm
        }
    }

    /// Noise-free tap.
    pub fn tap(&self, p: Point2) -> Result<TapResult, Error> {
        if !p.in_unit_square() {
            return Err(Error::OutOfArea { x: p.x, y: p.y });
        }
        let on_surface = self.on_footprint(p);
        Ok(self.result(self.true_height_cm(p), on_surface))
    }

    /// Tap with the scene's height noise applied to on-surface contacts.
    pub fn tap_noisy<R: Rng + ?Sized>(&self, p: Point2, rng: &mut R) -> Result<TapResult, Error> {
        let clean = self.tap(p)?;
        if !clean.on_surface || self.noise_sd_cm == 0.0 {
            return Ok(clean);
        }
        let normal = Normal::new(0.0, self.noise_sd_cm)
            .map_err(|_| Error::InvalidParameter("noise_sd_cm"))?;
        Ok(self.result(clean.raw_height_cm + normal.sample(rng), true))
    }

    fn result(&self, raw_height_cm: f64, on_surface: bool) -> TapResult {
        TapResult {
            height: raw_height_cm / self.height_scale_cm,
            on_surface,
            raw_height_cm,
        }
    }

    pub fn describe(&self) -> String {
        format!(
            "{} at ({}, {}) cm in {}x{} cm area, desk {} cm, height scale {} cm, noise sd {} cm",
            self.object.describe(),
            self.placement_cm.0,
            self.placement_cm.1,
            self.area_cm.0,
            self.area_cm.1,
            self.desk_height_cm,
            self.height_scale_cm,
            self.noise_sd_cm
        )
    }
}

impl Default for Scene {
    /// Wave block on the right side of a 23 × 23 cm area.
    fn default() -> Self {
        Scene::new(
            (Self::DEFAULT_AREA_CM, Self::DEFAULT_AREA_CM),
            wave_block(),
            Self::DEFAULT_PLACEMENT_CM,
            Self::DEFAULT_HEIGHT_SCALE_CM,
        )
        .expect("default scene is valid")
    }
}
