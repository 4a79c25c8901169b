"""
Run Log

In-memory audit trail of a recoating run, saved as JSON next to the
run's other outputs.
"""

import sys
import os
import json
from datetime import datetime

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from config.run_log_config import LOG_LEVELS
from dem.errors import InvalidParameterError


class RunLog:
    """Collect stage events of one run"""

    def __init__(self, run_label='run', verbose=True):
        self.run_label = run_label
        self.verbose = verbose
        self.events = []

    def log_event(self, stage, level, message, details=None):
        """
        Record an event

        Returns:
            the stored entry
        """
        if level not in LOG_LEVELS:
            raise InvalidParameterError(f"unknown log level '{level}'")
        entry = {
            'timestamp': datetime.now().isoformat(),
            'run': self.run_label,
            'stage': stage,
            'level': level,
            'message': message,
            'details': details or {}
        }
        self.events.append(entry)
        if self.verbose:
            marker = {'INFO': '✅', 'WARNING': '⚠️ ', 'CRITICAL': '❌'}[level]
            print(f"   {marker} [{stage}] {message}")
        return entry

    def info(self, stage, message, details=None):
        return self.log_event(stage, 'INFO', message, details)

    def warning(self, stage, message, details=None):
        return self.log_event(stage, 'WARNING', message, details)

    def critical(self, stage, message, details=None):
        return self.log_event(stage, 'CRITICAL', message, details)

    def get_events(self, level=None):
        """All events, optionally only one level"""
        if level is None:
            return self.events
        return [e for e in self.events if e['level'] == level]

    def save_run_log(self, filepath='logs/run_log.json'):
        """Save events to a JSON file"""
        directory = os.path.dirname(filepath)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(filepath, 'w') as f:
            json.dump(self.events, f, indent=2, default=str)
        if self.verbose:
            print(f"✅ Run log saved: {filepath}")
        return filepath

    def print_run_summary(self):
        """Print warnings and critical events"""
        flagged = [e for e in self.events if e['level'] != 'INFO']

        print("\n" + "=" * 70)
        print(f"RUN SUMMARY: {self.run_label}")
        print("=" * 70)
        print(f"Events logged: {len(self.events)}")
        print(f"Warnings: {len(self.get_events('WARNING'))}")
        print(f"Critical: {len(self.get_events('CRITICAL'))}")

        if flagged:
            print("\nFLAGGED EVENTS:")
            for event in flagged:
                print(f"\n  📋 Stage: {event['stage']}")
                print(f"     Level: {event['level']}")
                print(f"     Message: {event['message']}")
