"""
DOA API - Main Application

FastAPI application exposing the distractor-aware adaptation pipeline
"""
import logging
import os

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from dotenv import load_dotenv

from api.routes import evaluations, runs, synth

# Load environment variables
load_dotenv()

logging.basicConfig(
    level=getattr(logging, os.getenv("DOA_LOG_LEVEL", "WARNING").upper(), logging.WARNING),
    format="%(asctime)s %(levelname)s %(name)s: %(message)s",
)

# Create FastAPI app
app = FastAPI(
    title="DOA API",
    description="""
Distractor-aware online adaptation for video object segmentation.

## Features

* **Runs** - Pseudo-GT, hard-negative/negative/positive selection and adaptation plans for a sequence
* **Evaluations** - Region similarity J and contour similarity F against ground truth
* **Synthetic Scenes** - Seeded sequences with planted static distractors

## Key Concepts

- **Pseudo ground truth**: first-frame proposals that overlap the motion mask
- **Hard negatives**: consistently re-detected proposals that do not move
- **Adaptation plan**: per-frame training directive consumed by an external trainer
    """,
    version="1.0.0",
    docs_url="/docs",
    redoc_url="/redoc"
)

# CORS middleware (allow all origins for development)
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

# Include routers
app.include_router(runs.router)
app.include_router(evaluations.router)
app.include_router(synth.router)


@app.get("/")
def root():
    """Root endpoint - API info"""
    return {
        "name": "DOA API",
        "version": "1.0.0",
        "docs": "/docs",
        "endpoints": {
            "runs": "/runs",
            "evaluations": "/evaluations",
            "synth": "/synth"
        }
    }


@app.get("/health")
def health():
    """Health check endpoint"""
    return {"status": "healthy"}


if __name__ == "__main__":
    import uvicorn
    uvicorn.run(app, host="0.0.0.0", port=8000)
