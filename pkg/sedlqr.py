from src.cli import sedlqr

if __name__ == "__main__":
    sedlqr()
