"""
Pydantic schemas for the hocov domain types.
"""
