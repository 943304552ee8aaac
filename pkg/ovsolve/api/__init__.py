"""API routers for the OV solver service"""
