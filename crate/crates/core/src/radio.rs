//! Link-budget kernel: Shannon–Hartley capacity, Friis free-space
//! propagation, the power-capacity function, the Gaussian radiation pattern
//! and the point-source interference kernel.
//!
//! Everything here works in linear SI units. Decibels appear only at the
//! serialization boundary.

use std::f64::consts::{PI, SQRT_2};

use thiserror::Error;

use crate::model::{Antenna, Link, Point};

pub type Watts = f64;
pub type BitsPerSecond = f64;
pub type Radians = f64;
pub type Meters = f64;
pub type Hertz = f64;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum PhysicsError {
    #[error("noise power must be positive, got {0}")]
    NonPositiveNoise(f64),
    #[error("bandwidth must be positive, got {0}")]
    NonPositiveBandwidth(f64),
    #[error("distance must be positive, got {0}")]
    NonPositiveDistance(f64),
    #[error("frequency must be positive, got {0}")]
    NonPositiveFrequency(f64),
    #[error("interferer coincides with the receiver")]
    CoincidentPositions,
}

pub fn shannon_capacity(bandwidth: Hertz, signal: Watts, noise: Watts) -> Result<BitsPerSecond, PhysicsError> {
    if !(noise > 0.0) {
        return Err(PhysicsError::NonPositiveNoise(noise));
    }
    if !(bandwidth > 0.0) {
        return Err(PhysicsError::NonPositiveBandwidth(bandwidth));
    }
    Ok(bandwidth * (1.0 + signal / noise).log2())
}

/// Free-space received power `P_t · D_r · D_t · (c / 4πdf)²`.
pub fn friis_received_power(
    p_t: Watts,
    rx_directivity: f64,
    tx_directivity: f64,
    dist: Meters,
    freq: Hertz,
) -> Result<Watts, PhysicsError> {
    if !(dist > 0.0) {
        return Err(PhysicsError::NonPositiveDistance(dist));
    }
    if !(freq > 0.0) {
        return Err(PhysicsError::NonPositiveFrequency(freq));
    }
    let ratio = SPEED_OF_LIGHT / (4.0 * PI * dist * freq);
    Ok(p_t * rx_directivity * tx_directivity * ratio * ratio)
}

/// Capacity of `link` transmitting at `p_t` over `dist` with no
/// interference.
pub fn pc_capacity(link: &Link, p_t: Watts, dist: Meters) -> Result<BitsPerSecond, PhysicsError> {
    let received = friis_received_power(p_t, link.rx_directivity, link.tx_directivity, dist, link.frequency_hz)?;
    shannon_capacity(link.bandwidth_hz, received, link.noise_w)
}

/// Radiation-pattern gain `exp(-4θ² / (√2 w²))`.
pub fn rpf_gain(theta: Radians, w: Radians) -> f64 {
    (-4.0 * theta * theta / (SQRT_2 * w * w)).exp()
}

/// Angle between the receiver's boresight and the direction towards the
/// interferer, in `[0, π]`.
pub fn angle_of_reception(receiver: &Antenna, interferer: Point) -> Result<Radians, PhysicsError> {
    if receiver.position == interferer {
        return Err(PhysicsError::CoincidentPositions);
    }
    let bearing = receiver.position.bearing_to(interferer);
    let offset = (bearing - receiver.boresight).rem_euclid(2.0 * PI);
    Ok(if offset > PI { 2.0 * PI - offset } else { offset })
}

/// Pattern-weighted point-source spreading `z(θ) / (4πd²)` from an
/// interferer at `interferer` into `receiver`.
pub fn interference_kernel(receiver: &Antenna, interferer: Point) -> Result<f64, PhysicsError> {
    let theta = angle_of_reception(receiver, interferer)?;
    let d = receiver.position.distance(interferer);
    Ok(rpf_gain(theta, receiver.beamwidth) / (4.0 * PI * d * d))
}

/// Interference received at `receiver` from a transmitter at `interferer`
/// radiating `interferer_tx`.
pub fn interference_power_at(
    receiver: &Antenna,
    interferer: Point,
    interferer_tx: Watts,
) -> Result<Watts, PhysicsError> {
    Ok(interferer_tx * interference_kernel(receiver, interferer)?)
}

/// Transmit power at which an interferer at `interferer` delivers exactly
/// `target` into `receiver`: `4πd² · target / z(θ)`. Infinite when the
/// pattern gain underflows to zero.
pub fn power_for_interference(receiver: &Antenna, interferer: Point, target: Watts) -> Result<Watts, PhysicsError> {
    Ok(target / interference_kernel(receiver, interferer)?)
}

pub fn watts_to_dbm(w: Watts) -> f64 {
    10.0 * (w * 1e3).log10()
}

pub fn dbm_to_watts(dbm: f64) -> Watts {
    10f64.powf(dbm / 10.0) * 1e-3
}
