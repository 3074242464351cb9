import logging

# Keep wire chatter out of test output; tests assert on frames, not logs.
logging.getLogger("heprep.wire").setLevel(logging.WARNING)
