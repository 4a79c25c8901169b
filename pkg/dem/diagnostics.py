"""
Energy and Contact Diagnostics

Read-only summaries of a state and the engine's last contact evaluation.
"""

import numpy as np


def kinetic_energy(state):
    """Translational plus rotational kinetic energy [J]"""
    translational = 0.5 * np.sum(state.mass * np.einsum('ij,ij->i', state.velocity, state.velocity))
    rotational = 0.5 * np.sum(state.inertia * np.einsum('ij,ij->i', state.omega, state.omega))
    return float(translational + rotational)


def gravitational_energy(state, material, reference_height=0.0):
    g = -float(material.gravity[2])
    return float(np.sum(state.mass * g * (state.position[:, 2] - reference_height)))


def spring_energy(engine):
    """Energy stored in normal and tangential springs of the last evaluation"""
    material = engine.material
    energy = 0.0
    pairs = engine.last_contacts.get('pairs')
    groups = ([pairs] if pairs is not None else []) + engine.last_contacts.get('walls', [])
    for terms in groups:
        overlap = np.maximum(-terms['gap'], 0.0)
        energy += 0.5 * material.k_n * float(np.sum(overlap ** 2))
        xi = terms['xi']
        energy += 0.5 * material.k_t * float(np.sum(xi * xi))
    return energy


def total_energy(state, engine):
    return kinetic_energy(state) + gravitational_energy(state, engine.material) + spring_energy(engine)


def max_relative_penetration(engine, interaction_class=None):
    """
    Largest overlap / r_eff over touching contacts

    Args:
        interaction_class: None for all, 'particle', 'blade' or 'wall'
    """
    worst = 0.0
    pairs = engine.last_contacts.get('pairs')
    if pairs is not None and interaction_class in (None, 'particle') and len(pairs['gap']):
        worst = max(worst, float(np.max(np.maximum(-pairs['gap'], 0.0) / pairs['r_eff'])))
    if interaction_class != 'particle':
        for terms in engine.last_contacts.get('walls', []):
            if interaction_class is not None and terms['class'] != interaction_class:
                continue
            if len(terms['gap']):
                worst = max(worst, float(np.max(np.maximum(-terms['gap'], 0.0) / terms['r_eff'])))
    return worst


def coordination_number(engine, count):
    """Mean number of touching particle neighbors per particle"""
    pairs = engine.last_contacts.get('pairs')
    if pairs is None or count == 0:
        return 0.0
    touching = int(np.count_nonzero(pairs['gap'] < 0.0))
    return 2.0 * touching / count


def max_tangential_ratio(engine):
    """max |f_CT| / (mu |f_CN,repulsive|) over touching contacts (<= 1 under the cap)"""
    material = engine.material
    worst = 0.0
    pairs = engine.last_contacts.get('pairs')
    groups = []
    if pairs is not None:
        groups.append((pairs, material.mu))
    for terms in engine.last_contacts.get('walls', []):
        groups.append((terms, material.interaction(terms['class'])[1]))
    for terms, mu in groups:
        cap = mu * np.maximum(terms['contact'], 0.0)
        magnitude = np.sqrt(np.einsum('ij,ij->i', terms['f_t'], terms['f_t']))
        loaded = cap > 0
        if np.any(loaded):
            worst = max(worst, float(np.max(magnitude[loaded] / cap[loaded])))
    return worst
