"""
Contact and Adhesion Laws

Pure force-law functions of the soft-sphere model:
- critical time step of the explicit scheme
- linear spring-dashpot normal contact with restitution-based damping
- regularized van der Waals adhesion
- incremental tangential spring with Coulomb cap
- constant-torque rolling resistance

All functions accept numpy arrays (one entry per contact) as well as scalars.
"""

import sys
import os
import math

import numpy as np

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from config.material_config import CRITICAL_TIMESTEP_FACTOR
from dem.errors import InvalidParameterError


def critical_timestep(material, m_min):
    """
    Stability bound of the explicit integrator

    Args:
        material: MaterialTable (uses k_n)
        m_min: smallest particle mass [kg]
    Returns:
        0.2 * sqrt(m_min / k_N) [s]
    """
    if not m_min > 0:
        raise InvalidParameterError(f"m_min must be > 0, got {m_min}")
    if not material.k_n > 0:
        raise InvalidParameterError(f"k_n must be > 0, got {material.k_n}")
    return CRITICAL_TIMESTEP_FACTOR * math.sqrt(m_min / material.k_n)


def effective_radius(r_i, r_j=None):
    """Reduced radius; a wall (r_j=None) leaves r_i unchanged"""
    if r_j is None:
        return np.asarray(r_i, dtype=float)
    r_i = np.asarray(r_i, dtype=float)
    r_j = np.asarray(r_j, dtype=float)
    return r_i * r_j / (r_i + r_j)


def effective_mass(m_i, m_j=None):
    """Reduced mass; a wall (m_j=None) leaves m_i unchanged"""
    if m_j is None:
        return np.asarray(m_i, dtype=float)
    m_i = np.asarray(m_i, dtype=float)
    m_j = np.asarray(m_j, dtype=float)
    return m_i * m_j / (m_i + m_j)


def damping_constant(material, m_eff):
    """
    Dashpot constant giving a rebound ratio of exactly c_COR

    d_N = 2 |ln e| sqrt(k_N m_eff) / sqrt(pi^2 + ln^2 e)
    """
    log_e = math.log(material.restitution)
    return 2.0 * abs(log_e) * np.sqrt(material.k_n * np.asarray(m_eff, dtype=float)) \
        / math.sqrt(math.pi ** 2 + log_e ** 2)


def regularization_gap(hamaker, gamma):
    """
    Inner saturation gap g0 of the van der Waals law

    Returns inf where gamma == 0 (adhesion off).
    """
    gamma = np.asarray(gamma, dtype=float)
    with np.errstate(divide='ignore'):
        return np.where(gamma > 0, np.sqrt(hamaker / (24.0 * math.pi * np.maximum(gamma, 1e-300))),
                        np.inf)


def pull_off_force(gamma, r_eff):
    """Maximum adhesive force 4 pi gamma r_eff [N]"""
    return 4.0 * math.pi * np.asarray(gamma, dtype=float) * np.asarray(r_eff, dtype=float)


def normal_contact_force(gap, approach_velocity, m_eff, material):
    """
    Spring-dashpot normal force

    Args:
        gap: signed surface gap g [m] (negative = overlap)
        approach_velocity: overlap rate d(delta)/dt = -dg/dt [m/s]
        m_eff: reduced mass of the pair [kg]
        material: MaterialTable
    Returns:
        k_N delta + d_N delta_dot where overlapping, 0 otherwise [N]
        (positive = repulsive, the dashpot may make it negative)
    """
    gap = np.asarray(gap, dtype=float)
    overlap = np.maximum(-gap, 0.0)
    force = material.k_n * overlap + damping_constant(material, m_eff) * approach_velocity
    return np.where(gap < 0.0, force, 0.0)


def adhesion_force(gap, r_eff, gamma, material):
    """
    Regularized van der Waals attraction

    Magnitude A r_eff / (6 s^2) with s = max(g, g0), zero beyond
    g_cut = cutoff_factor * g0 and for gamma == 0.

    Returns:
        signed normal force [N], <= 0 (attractive)
    """
    gap = np.asarray(gap, dtype=float)
    gamma = np.broadcast_to(np.asarray(gamma, dtype=float), gap.shape)
    g0 = regularization_gap(material.hamaker, gamma)
    active = (gamma > 0) & (gap <= material.cutoff_factor * g0)
    s = np.where(active, np.maximum(gap, g0), 1.0)
    magnitude = material.hamaker * np.asarray(r_eff, dtype=float) / (6.0 * s * s)
    return np.where(active, -magnitude, 0.0)


def net_normal_force(contact_force, adhesive_force, gamma, r_eff):
    """
    Contact plus adhesion with the tensile clamp

    The sum is never more attractive than the pull-off force. Pairs without
    adhesion (gamma == 0) keep the bare dashpot while overlapping.
    """
    total = np.asarray(contact_force, dtype=float) + np.asarray(adhesive_force, dtype=float)
    gamma = np.broadcast_to(np.asarray(gamma, dtype=float), total.shape)
    bound = -pull_off_force(gamma, r_eff)
    return np.where(gamma > 0, np.maximum(total, bound), total)


def _rows(vectors):
    return np.atleast_2d(np.asarray(vectors, dtype=float))


def tangential_friction_force(displacement, tangential_velocity, normal_force, mu, k_t,
                              dt, normal):
    """
    Incremental tangential spring with Coulomb cap

    The stored displacement is first rotated into the current tangent plane
    (magnitude kept), then advanced by v_t * dt. If k_T |xi| exceeds
    mu |f_CN,repulsive| the force is capped and xi rescaled to the sliding value.

    Args:
        displacement: stored spring displacement xi, shape (n, 3) [m]
        tangential_velocity: relative tangential velocity at the contact point [m/s]
        normal_force: repulsive normal force magnitude [N]
        mu: friction coefficient (scalar or per contact)
        k_t: tangential stiffness [N/m]
        dt: time step [s]
        normal: unit contact normals, shape (n, 3)
    Returns:
        (force, new_displacement), both shape (n, 3)
    """
    xi = _rows(displacement)
    n = _rows(normal)
    v_t = _rows(tangential_velocity)

    old_norm = np.sqrt(np.einsum('ij,ij->i', xi, xi))
    xi = xi - np.einsum('ij,ij->i', xi, n)[:, None] * n
    new_norm = np.sqrt(np.einsum('ij,ij->i', xi, xi))
    scale = np.divide(old_norm, new_norm, out=np.ones_like(old_norm), where=new_norm > 0)
    xi = xi * scale[:, None]

    xi = xi + v_t * dt
    force = -k_t * xi

    cap = np.asarray(mu, dtype=float) * np.maximum(np.asarray(normal_force, dtype=float), 0.0)
    cap = np.broadcast_to(cap, old_norm.shape)
    magnitude = np.sqrt(np.einsum('ij,ij->i', force, force))
    sliding = magnitude > cap
    ratio = np.divide(cap, magnitude, out=np.zeros_like(magnitude), where=sliding)
    force = np.where(sliding[:, None], force * ratio[:, None], force)
    if k_t > 0:
        xi = np.where(sliding[:, None], -force / k_t, xi)
    return force, xi


def rolling_resistance_torque(omega_rel, normal_force, r_eff, mu_roll, deadband,
                              normal=None, inertia_eff=None, dt=None):
    """
    Constant-torque rolling resistance

    m_R = -mu_R r_eff |f_CN,repulsive| * unit(omega_roll); zero below the
    angular deadband. With a contact normal the twisting part of omega_rel is
    removed first. With inertia_eff and dt the magnitude is limited to
    I_eff |omega_roll| / dt so one step never reverses the rolling rate.

    Returns:
        torque on the first body, shape (n, 3) [N m]
    """
    omega = _rows(omega_rel)
    if normal is not None:
        n = _rows(normal)
        omega = omega - np.einsum('ij,ij->i', omega, n)[:, None] * n
    rate = np.sqrt(np.einsum('ij,ij->i', omega, omega))
    magnitude = mu_roll * np.asarray(r_eff, dtype=float) \
        * np.maximum(np.asarray(normal_force, dtype=float), 0.0)
    magnitude = np.broadcast_to(magnitude, rate.shape).copy()
    if inertia_eff is not None and dt is not None:
        magnitude = np.minimum(magnitude, np.asarray(inertia_eff, dtype=float) * rate / dt)
    rolling = (rate >= deadband) & (rate > 0.0)
    unit = np.divide(omega, rate[:, None], out=np.zeros_like(omega), where=rolling[:, None])
    return -np.where(rolling, magnitude, 0.0)[:, None] * unit
