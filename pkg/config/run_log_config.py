"""
Run Log Configuration

Event levels and process exit codes
"""

LOG_LEVELS = {
    'INFO': 'Routine stage progress',
    'WARNING': 'Non-fatal anomaly (e.g. settle not converged)',
    'CRITICAL': 'Run aborted (timestep guard, particle left domain)'
}

EXIT_CODES = {
    'success': 0,
    'config_error': 1,
    'runtime_abort': 2,
    'partial_sweep_failure': 3
}

STAGES = ['fill', 'settle', 'dose', 'spread', 'relax', 'evaluate']
