"""
Results ledger for evaluation runs
"""
import json
import logging
import os
import sqlite3
from datetime import datetime

logger = logging.getLogger("DatabaseManager")

CLASSIFIER_ORDER = ("svm", "knn", "gnb")


class DatabaseManager:
    def __init__(self, db_file="vibrodiag_results.db"):
        """Open (and create if needed) the results database"""
        db_dir = os.path.dirname(db_file)
        if db_dir and not os.path.exists(db_dir):
            os.makedirs(db_dir)

        self.db_file = db_file
        self.initialize_db()

    def initialize_db(self):
        """Initialize the database schema"""
        conn = sqlite3.connect(self.db_file)
        cursor = conn.cursor()

        cursor.execute('''
        CREATE TABLE IF NOT EXISTS evaluation_results (
            id INTEGER PRIMARY KEY AUTOINCREMENT,
            classifier TEXT NOT NULL,
            mode TEXT NOT NULL,
            params TEXT NOT NULL,
            weighted_accuracy REAL NOT NULL,
            mean_fold_accuracy REAL NOT NULL,
            fold_accuracies TEXT NOT NULL,
            features_path TEXT NOT NULL,
            seed INTEGER NOT NULL,
            elapsed_s REAL NOT NULL,
            timestamp TEXT NOT NULL
        )
        ''')

        conn.commit()
        conn.close()

    def save_evaluation(self, report, features_path=""):
        """Store one EvalReport"""
        conn = sqlite3.connect(self.db_file)
        cursor = conn.cursor()

        timestamp = datetime.now().strftime("%Y-%m-%d %H:%M:%S")

        cursor.execute('''
        INSERT INTO evaluation_results
        (classifier, mode, params, weighted_accuracy, mean_fold_accuracy, fold_accuracies,
         features_path, seed, elapsed_s, timestamp)
        VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?)
        ''', (report.spec.kind.value, report.plan.label, report.spec.describe(),
              report.weighted_accuracy, report.mean_fold_accuracy,
              json.dumps(report.fold_accuracies), str(features_path), int(report.plan.seed),
              report.elapsed_s, timestamp))

        conn.commit()
        conn.close()
        logger.info(f"Recorded {report.spec.describe()} ({report.plan.label}) in {self.db_file}")

    def get_best_results(self):
        """Best weighted accuracy per (classifier, mode)"""
        conn = sqlite3.connect(self.db_file)
        cursor = conn.cursor()

        cursor.execute('''
        SELECT classifier, mode, MAX(weighted_accuracy), params
        FROM evaluation_results
        GROUP BY classifier, mode
        ORDER BY classifier, mode
        ''')

        results = cursor.fetchall()
        conn.close()

        return results

    def get_history(self, classifier=None):
        """All runs, newest first, optionally for one classifier"""
        conn = sqlite3.connect(self.db_file)
        cursor = conn.cursor()

        query = '''
        SELECT classifier, mode, params, weighted_accuracy, mean_fold_accuracy,
               fold_accuracies, seed, elapsed_s, timestamp
        FROM evaluation_results
        '''
        if classifier:
            cursor.execute(query + ' WHERE classifier = ? ORDER BY id DESC', (classifier,))
        else:
            cursor.execute(query + ' ORDER BY id DESC')

        results = [row[:5] + (json.loads(row[5]),) + row[6:] for row in cursor.fetchall()]
        conn.close()

        return results

    def accuracy_table(self):
        """
        Classifier x mode table of best weighted accuracies.

        Returns:
        - (modes, rows) where rows is a list of (classifier, [accuracy or None per mode])
        """
        best = {(classifier, mode): accuracy for classifier, mode, accuracy, _ in self.get_best_results()}
        modes = sorted({mode for _, mode in best}, key=lambda mode: (mode != "1-fold", mode))
        classifiers = [name for name in CLASSIFIER_ORDER if any(key[0] == name for key in best)]
        rows = [(name, [best.get((name, mode)) for mode in modes]) for name in classifiers]
        return modes, rows
